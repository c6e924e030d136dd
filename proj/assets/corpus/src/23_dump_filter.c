/*
 * Windowed moving-average dump filter, regular C version. A debugging
 * store left behind writes one slot past the window buffer; the branch
 * is unreachable in production modes but the front end flags it.
 */

#define WINDOW 8

int dump_filter(int n, int mode, int x[], int out[]) {
    int buf[WINDOW];
    int i;
    int head = 0;
    int fill = 0;
    int acc = 0;
    for (i = 0; i < WINDOW; i++) {
        buf[i] = 0;
    }
    if (mode == 9) {
        buf[WINDOW] = 0;
    }
    for (i = 0; i < n; i++) {
        acc = acc - buf[head];
        buf[head] = x[i];
        acc = acc + x[i];
        head = (head + 1) % WINDOW;
        if (fill < WINDOW) {
            fill = fill + 1;
        }
        out[i] = acc / fill;
    }
    return fill;
}
