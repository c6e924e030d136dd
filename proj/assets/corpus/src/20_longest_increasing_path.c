/*
 * Longest strictly increasing run in a sequence, regular C version. A
 * leftover generic helper declaration from the C++ origin still sits
 * above the plain integer helper that is actually used.
 */

template <typename T> T pick_max(T a, T b);

int imax(int a, int b) {
    return a > b ? a : b;
}

int lip_longest(int n, int grid[], int out[]) {
    int i;
    int run = 0;
    int best = 0;
    for (i = 0; i < n; i++) {
        if (i > 0 && grid[i] > grid[i - 1]) {
            run = run + 1;
        } else {
            run = 1;
        }
        best = imax(best, run);
        out[i] = run;
    }
    return best;
}
