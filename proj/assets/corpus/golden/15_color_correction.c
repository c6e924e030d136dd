/*
 * Per-channel gain correction with saturation, HLS-C version: the
 * clip indicator is an integer bumped with explicit adds.
 */

int color_correct(int n, int rgb[], int gain, int out[]) {
    int i;
    int clipped = false;
    for (i = 0; i < n; i++) {
        int v = (rgb[i] * gain) / 64;
        if (v > 255) {
            v = 255;
            clipped = clipped + 1;
        }
        if (v < 0) {
            v = 0;
            clipped = clipped + 1;
        }
        out[i] = v;
    }
    out[n] = clipped ? 1 : 0;
    return clipped ? n : 0;
}
