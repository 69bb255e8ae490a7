# Copyright 2026 The udbm Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the 8x8 handwritten-digit images bundled with scikit-learn as an IDX file.

Pixel intensities 0..16 are rescaled to 0..255. Usage:

    python3 tools/make_digits_fixture.py tests/data/digits8x8.idx [count]
"""

import struct
import sys

import numpy as np
from sklearn.datasets import load_digits


def main() -> None:
    out = sys.argv[1]
    count = int(sys.argv[2]) if len(sys.argv) > 2 else 512
    images = load_digits().images[:count]
    pixels = np.rint(images * (255.0 / 16.0)).clip(0, 255).astype(np.uint8)
    with open(out, "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(pixels), 8, 8))
        f.write(pixels.tobytes())


if __name__ == "__main__":
    main()
