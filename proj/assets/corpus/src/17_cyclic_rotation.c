/*
 * Cyclic array rotation with a direction selector, regular C version.
 * The switch handles the two moving directions and leaves the hold
 * position to fall through.
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
    }
    return out[0];
}
