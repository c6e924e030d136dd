/*
 * Reverse copy through a pointer-to-pointer, regular C version. The
 * indirection is idiomatic on a CPU and hostile to synthesis.
 */

int reverse_copy(int n, int a[], int out[]) {
    int *p = a;
    int **pp = &p;
    int i;
    int moved = 0;
    for (i = 0; i < n; i++) {
        out[i] = (*pp)[n - 1 - i];
        moved = moved + 1;
    }
    return moved;
}
