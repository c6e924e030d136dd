/*
 * Reverse copy, HLS-C version: the array is indexed directly, no
 * pointer indirection.
 */

int reverse_copy(int n, int a[], int out[]) {
    int i;
    int moved = 0;
    for (i = 0; i < n; i++) {
        out[i] = a[n - 1 - i];
        moved = moved + 1;
    }
    return moved;
}
