/*
 * Bubble sort over small values. Synthesizable as written; every
 * loop counter and element register defaults to 32 bits.
 */

#define SORT_CAP 32

int bubble_sort(int n, int a[], int out[]) {
    int i;
    int j;
    int swaps = 0;
    for (i = 0; i < n; i++) {
        out[i] = a[i];
    }
    for (i = 0; i < n; i++) {
        for (j = 0; j + 1 < n - i; j++) {
            if (out[j] > out[j + 1]) {
                int tmp = out[j];
                out[j] = out[j + 1];
                out[j + 1] = tmp;
                swaps = swaps + 1;
            }
        }
    }
    return swaps;
}
