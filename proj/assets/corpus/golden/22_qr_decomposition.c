/*
 * Fixed-point column normalization, the first step of a QR sweep,
 * HLS-C version: the dead high-precision rescale path is gone.
 */

int qr_norm(int n, int prec, int v[], int out[]) {
    int i;
    int acc = 0;
    int scale;
    for (i = 0; i < n; i++) {
        acc = acc + v[i] * v[i];
    }
    scale = 1;
    while (scale * scale <= acc && scale < 1 << 14) {
        scale = scale + 1;
    }
    scale = scale - 1;
    for (i = 0; i < n; i++) {
        out[i] = scale > 0 ? (v[i] << prec) / scale : 0;
    }
    out[n] = scale;
    return scale;
}
