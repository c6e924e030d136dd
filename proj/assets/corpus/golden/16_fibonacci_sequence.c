/*
 * Fibonacci utilities behind a mode selector, HLS-C version: the
 * selector switch carries an explicit default arm.
 */

int fib_select(int sel, int k, int out[]) {
    int mode = sel & 3;
    int a = 0;
    int b = 1;
    int i;
    int result = 0;
    for (i = 0; i < k; i++) {
        int next = a + b;
        a = b;
        b = next;
    }
    switch (mode) {
    case 0:
        result = a;
        break;
    case 1:
        result = a % 10;
        break;
    case 2:
        result = a + b;
        break;
    default:
        break;
    }
    out[0] = result;
    return result;
}
