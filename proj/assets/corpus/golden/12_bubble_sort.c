/*
 * Bubble sort over small values, HLS-C version: loop counters and
 * element registers carry exactly the bits the data needs.
 */

#define SORT_CAP 32

int bubble_sort(ac_int<6, false> n, int a[], int out[]) {
    ac_int<6, false> i;
    ac_int<5, false> j;
    ac_int<9, false> swaps = 0;
    for (i = 0; i < n; i++) {
        out[i] = a[i];
    }
    for (i = 0; i < n; i++) {
        for (j = 0; j + 1 < n - i; j++) {
            if (out[j] > out[j + 1]) {
                ac_int<7, false> tmp = out[j];
                out[j] = out[j + 1];
                out[j + 1] = tmp;
                swaps = swaps + 1;
            }
        }
    }
    return swaps;
}
