"""Published benchmark errors, kept for side-by-side comparison only.

Layout: ``REFERENCE[exp_id][metric][method]`` is a list aligned with
``simlab.EXPERIMENTS[exp_id].cells``. The ebmw/ebkm/ebmed methods are never
recomputed here.
"""

from __future__ import annotations


def _rows(text: str) -> dict[str, list[int]]:
    out = {}
    for line in text.strip().splitlines():
        name, *vals = line.split()
        out[name] = [int(v) for v in vals]
    return out


REFERENCE = {
    "exp1": {
        "mse": _rows("""
            ebmw    10 54 21 13   20 96 35 25   40 152 61 49   79 234 108 96
            ebkm    12 35 15 6    21 53 19 7    32 74 25 7     44 93 30 8
            ebmed   10 43 22 14   20 69 36 28   37 103 66 54   64 157 127 107
            sure    14 42 45 43   23 68 69 69   42 104 105 105 74 152 153 153
            soft    10 76 116 116 20 153 228 233 40 304 457 464 80 609 916 929
            hard    13 61 21 12   24 122 39 23  45 237 75 42   87 473 149 82
            fdr0.01 10 75 25 11   20 143 40 22  41 253 67 44   81 434 112 85
            fdr0.1  11 55 24 20   23 93 39 37   44 141 67 64   88 208 113 111
            fdr0.4  22 63 53 51   36 94 82 80   64 134 119 117 119 175 161 161
            dp      11 37 11 3    19 50 17 4    33 71 22 4     46 92 26 6
        """),
        "mae": _rows("""
            ebmw    10 23 14 13   20 43 26 24   40 74 47 45    80 125 86 83
            ebkm    27 35 22 19   40 48 25 20   60 62 29 21    82 76 32 22
            ebmed   12 21 12 10   23 38 23 20   44 72 45 39    80 133 96 80
            sure    15 30 32 31   24 49 51 51   44 78 79 79    78 117 119 119
            soft    10 27 33 33   20 54 65 65   40 109 130 130 80 217 260 261
            hard    11 22 10 9    21 45 19 17   41 88 37 32    82 175 74 64
            fdr0.01 10 27 10 8    20 51 19 17   40 93 36 33    80 163 69 66
            fdr0.1  10 21 12 11   21 36 22 22   41 59 41 41    82 98 77 76
            fdr0.4  14 26 25 25   25 44 43 42   48 72 70 70    94 110 108 108
            dp      23 31 18 14   36 42 20 16   61 57 25 17    87 72 27 19
        """),
    },
    "exp2": {
        "mse": _rows("""
            ebmw    138 99 52    233 156 90   385 248 153
            ebkm    81 57 28     120 80 41    174 114 52
            ebmed   107 78 50    165 124 91   254 208 163
            sure    102 106 105  163 168 170  257 260 259
            soft    201 289 327  403 577 658  806 1155 1308
            hard    172 143 64   341 282 129  680 563 251
            fdr0.01 192 151 62   356 241 101  639 385 164
            fdr0.1  139 87 55    224 135 99   355 213 167
            fdr0.4  150 133 126  229 206 201  332 302 294
            dp      80 55 25     119 79 35    171 109 49
        """),
        "mae": _rows("""
            ebmw    58 47 36     105 82 66    186 143 118
            ebkm    75 54 38     102 67 45    139 84 50
            ebmed   49 37 29     88 69 58     176 135 113
            sure    73 76 75     120 124 124  194 196 196
            soft    70 83 87     141 166 175  281 332 349
            hard    62 44 26     123 86 52    245 172 102
            fdr0.01 67 46 26     127 77 48    233 134 90
            fdr0.1  52 34 29     87 61 56     148 111 103
            fdr0.4  63 61 60     107 106 106  179 175 174
            dp      60 42 29     93 58 34     128 74 43
        """),
    },
    "exp3": {
        "mse": _rows("""
            ebmw    110 91 62    186 150 103  308 245 176
            ebkm    77 68 49     121 105 77   185 163 124
            ebmed   93 79 59     151 130 100  236 212 176
            sure    96 104 106   155 165 168  243 257 260
            soft    196 269 313  389 534 626  780 1075 1251
            hard    135 123 79   263 237 155  527 479 311
            fdr0.01 151 129 79   268 216 133  479 368 221
            fdr0.1  112 90 66    187 148 110  300 235 187
            fdr0.4  138 137 129  216 213 201  320 307 301
            dp      76 68 53     120 110 84   189 164 123
        """),
        "mae": _rows("""
            ebmw    51 46 38     92 82 69     164 145 126
            ebkm    75 63 52     108 91 74    160 135 111
            ebmed   44 38 31     79 70 59     147 132 115
            sure    69 74 76     114 122 124  187 195 197
            soft    67 79 86     133 158 171  266 317 342
            hard    51 43 31     100 84 61    200 169 121
            fdr0.01 55 44 31     101 80 57    188 144 104
            fdr0.1  45 37 31     81 67 58     143 120 108
            fdr0.4  60 62 60     105 107 105  176 175 176
            dp      59 54 44     97 84 69     156 127 102
        """),
    },
    "exp4": {
        "mse": _rows("""
            ebmw    320 421 291 175 134 125
            ebkm    206 223 150 79 46 35
            ebmed   337 350 240 173 148 138
            sure    278 327 333 337 336 334
            soft    504 894 1259 1436 1475 1483
            hard    375 671 610 301 134 102
            fdr0.01 375 633 441 199 121 111
            fdr0.1  373 421 259 194 185 181
            fdr0.4  440 451 404 403 399 396
            dp      204 220 161 205 151 85
        """),
        "mae": _rows("""
            ebmw    179 199 159 130 122 120
            ebkm    225 182 115 79 61 61
            ebmed   176 161 127 110 101 97
            sure    209 241 245 248 246 247
            soft    216 294 347 367 371 372
            hard    189 242 184 110 85 80
            fdr0.01 189 232 147 96 85 83
            fdr0.1  188 168 120 110 109 108
            fdr0.4  217 214 208 212 210 209
            dp      215 161 91 89 75 57
        """),
    },
}
