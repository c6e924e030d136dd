/*
 * Cyclic array rotation with a direction selector, HLS-C version: the
 * hold position is spelled out as the default arm.
 */

enum Dir { DIR_LEFT, DIR_RIGHT, DIR_HOLD };

int rotate(int n, int a[], int dir, int out[]) {
    int i;
    enum Dir d = (enum Dir)dir;
    for (i = 0; i < n; i++) {
        out[i] = a[i];
    }
    switch (d) {
    case DIR_LEFT:
        for (i = 0; i < n; i++) {
            out[i] = a[(i + 1) % n];
        }
        break;
    case DIR_RIGHT:
        for (i = 0; i < n; i++) {
            out[i] = a[(i + n - 1) % n];
        }
        break;
    default:
        break;
    }
    return out[0];
}
