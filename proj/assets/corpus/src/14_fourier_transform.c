/*
 * Small integer Fourier power probe over an 8-point cosine table,
 * regular C version. The scaling flag is a bool fed with +=.
 */

int costab[8] = {64, 45, 0, -45, -64, -45, 0, 45};
int sintab[8] = {0, 45, 64, 45, 0, -45, -64, -45};

int dft_power(int n, int sig[], int out[]) {
    int k;
    int i;
    int peak = 0;
    bool scaled = false;
    for (k = 0; k < 4; k++) {
        int re = 0;
        int im = 0;
        for (i = 0; i < n; i++) {
            int phase = (i * k) & 7;
            re = re + sig[i] * costab[phase];
            im = im + sig[i] * sintab[phase];
        }
        re = re / 64;
        im = im / 64;
        out[k] = re * re + im * im;
        if (out[k] > 4000000) {
            out[k] = out[k] / 4;
            scaled += 1;
        }
        if (out[k] > peak) {
            peak = out[k];
        }
    }
    out[4] = scaled ? 1 : 0;
    return peak;
}
