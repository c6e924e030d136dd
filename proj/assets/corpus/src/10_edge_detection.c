/*
 * One-dimensional edge detector over 8-bit pixels. Compiles for HLS as
 * written, but every variable sits in a default-width register far
 * wider than the data it carries.
 */

#define MAX_PIX 64

int edge_detect(int n, int pix[], int out[]) {
    int i;
    int strongest = 0;
    for (i = 0; i < n; i++) {
        int left = i > 0 ? pix[i - 1] : pix[i];
        int right = i + 1 < n ? pix[i + 1] : pix[i];
        int grad = right - left;
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
