# opfuzz test case 78e7d38a301fb6cb1aa85bc17a59a673
# Conv2d, dtype f32, paddle, generated by opfuzz 0.1.0
import os
import sys

import numpy as np
import paddle

DEVICE = os.environ.get("OPFUZZ_DEVICE", "gpu")
DTYPE = "float32"
IS_FLOAT = True
EXPECTED = (1, 8, 126, 126)
SEED = 2028458890
RNG = np.random.default_rng(SEED)
paddle.set_device(DEVICE)
paddle.seed(SEED)
if IS_FLOAT:
    paddle.set_default_dtype(DTYPE)


def make(shape):
    if IS_FLOAT:
        data = RNG.random(shape)
    else:
        data = RNG.integers(0, 8, shape)
    return paddle.to_tensor(data, dtype=DTYPE)


def run():
    x0 = make((1, 3, 128, 128))
    op = paddle.nn.Conv2D(in_channels=3, out_channels=8, kernel_size=[5, 5], stride=[1, 1], padding=[1, 1], dilation=[1, 1], groups=1)
    y = op(x0)
    return y


def main():
    try:
        y = run()
        if DEVICE.startswith("gpu"):
            paddle.device.synchronize()
    except Exception as e:  # noqa: BLE001
        msg = str(e).lower()
        if "out of memory" in msg or "can't allocate" in msg:
            print("OOM")
            return 1
        print("EXCEPTION:" + type(e).__name__)
        return 1
    if tuple(y.shape) != EXPECTED:
        print("EXCEPTION:ShapeMismatch")
        return 1
    print("OK")
    return 0


if __name__ == "__main__":
    sys.exit(main())
