/*
 * Largest set of collinear points on the integer plane, HLS-C version:
 * the comparison helper is called directly.
 */

int strictly_better(int a, int b) {
    return a > b;
}

int max_points(int n, int xs[], int ys[]) {
    int best = 0;
    int i;
    int j;
    int k;
    if (n == 1) {
        return 1;
    }
    for (i = 0; i < n; i++) {
        for (j = i + 1; j < n; j++) {
            int count = 2;
            int ax = xs[j] - xs[i];
            int ay = ys[j] - ys[i];
            for (k = 0; k < n; k++) {
                if (k != i && k != j) {
                    int bx = xs[k] - xs[i];
                    int by = ys[k] - ys[i];
                    if (ax * by - ay * bx == 0) {
                        count = count + 1;
                    }
                }
            }
            if (strictly_better(count, best)) {
                best = count;
            }
        }
    }
    return best;
}
