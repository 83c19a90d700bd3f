# opfuzz test case 78e7d38a301fb6cb1aa85bc17a59a673
# Conv2d, dtype f32, tensorflow, generated by opfuzz 0.1.0
import os
import sys

import numpy as np
import tensorflow as tf

DEVICE = os.environ.get("OPFUZZ_DEVICE", "/GPU:0")
DTYPE = "float32"
IS_FLOAT = True
PAD_MIN = float("-inf") if IS_FLOAT else tf.as_dtype(DTYPE).min
EXPECTED = (1, 126, 126, 8)
SEED = 2028458890
RNG = np.random.default_rng(SEED)
tf.random.set_seed(SEED)


def make(shape):
    if IS_FLOAT:
        data = RNG.random(shape)
    else:
        data = RNG.integers(0, 8, shape)
    return tf.constant(data, dtype=DTYPE)


def run():
    with tf.device(DEVICE):
        x0 = make((1, 128, 128, 3))
        x0 = tf.pad(x0, [[0, 0], [1, 1], [1, 1], [0, 0]])
        op = tf.keras.layers.Conv2D(filters=8, kernel_size=(5, 5), strides=(1, 1), padding="valid", dilation_rate=(1, 1), groups=1, dtype=DTYPE)
        y = op(x0)
    return y


def main():
    try:
        y = run()
        tf.test.experimental.sync_devices()
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
