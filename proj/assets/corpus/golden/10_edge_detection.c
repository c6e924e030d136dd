/*
 * One-dimensional edge detector over 8-bit pixels, HLS-C version:
 * every register is sized to the value range the dataset exercises.
 */

#define MAX_PIX 64

int edge_detect(ac_int<7, false> n, int pix[], int out[]) {
    ac_int<7, false> i;
    ac_int<8, false> strongest = 0;
    for (i = 0; i < n; i++) {
        ac_int<8, false> left = i > 0 ? pix[i - 1] : pix[i];
        ac_int<8, false> right = i + 1 < n ? pix[i + 1] : pix[i];
        ac_int<9, true> grad = right - left;
        if (grad < 0) {
            grad = -grad;
        }
        if (grad > 255) {
            grad = 255;
        }
        out[i] = grad;
        if (grad > strongest) {
            strongest = grad;
        }
    }
    return strongest;
}
