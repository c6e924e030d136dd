/*
 * Fibonacci utilities behind a mode selector, regular C version. The
 * selector switch covers only the modes in use today and trusts the
 * caller about the rest.
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
    }
    out[0] = result;
    return result;
}
