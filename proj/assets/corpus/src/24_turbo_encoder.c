/*
 * Rate-1/2 convolutional encoder with constraint length 3, regular C
 * version. A calibration branch multiplies the parity stream by a
 * power of two whose exponent equals the register width; hardware
 * front ends reject the shift outright.
 */

#define GAIN_SHIFT 32

int turbo_encode(int n, int boost, int bits[], int out[]) {
    int s0 = 0;
    int s1 = 0;
    int i;
    int parity = 0;
    for (i = 0; i < n; i++) {
        int b = bits[i] & 1;
        int y0 = b ^ s0 ^ s1;
        int y1 = b ^ s1;
        if (boost == 3) {
            y1 = y1 << GAIN_SHIFT;
        }
        out[2 * i] = y0;
        out[2 * i + 1] = y1;
        parity = parity ^ y0 ^ y1;
        s1 = s0;
        s0 = b;
    }
    return parity;
}
