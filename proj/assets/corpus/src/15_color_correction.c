/*
 * Per-channel gain correction with saturation, regular C version. The
 * clip indicator is a bool counted up with ++.
 */

int color_correct(int n, int rgb[], int gain, int out[]) {
    int i;
    bool clipped = false;
    for (i = 0; i < n; i++) {
        int v = (rgb[i] * gain) / 64;
        if (v > 255) {
            v = 255;
            clipped++;
        }
        if (v < 0) {
            v = 0;
            clipped++;
        }
        out[i] = v;
    }
    out[n] = clipped ? 1 : 0;
    return clipped ? n : 0;
}
