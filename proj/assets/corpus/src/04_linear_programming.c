/*
 * Integer tableau scan for a tiny two-variable linear program, regular
 * C version. The working tableau is heap-allocated and released once
 * the scan is over.
 */
#include <stdlib.h>

#define TAB_R 3
#define TAB_C 4

int lp_solve(int c0, int c1, int b0, int b1, int out[]) {
    int *tab = (int *)malloc(TAB_R * TAB_C * sizeof(int));
    int i;
    int best = 0;
    int best_x = 0;
    int best_y = 0;
    int x;
    int y;
    tab[0 * TAB_C + 0] = 2;
    tab[0 * TAB_C + 1] = 1;
    tab[0 * TAB_C + 2] = 0;
    tab[0 * TAB_C + 3] = b0;
    tab[1 * TAB_C + 0] = 1;
    tab[1 * TAB_C + 1] = 3;
    tab[1 * TAB_C + 2] = 0;
    tab[1 * TAB_C + 3] = b1;
    tab[2 * TAB_C + 0] = c0;
    tab[2 * TAB_C + 1] = c1;
    tab[2 * TAB_C + 2] = 0;
    tab[2 * TAB_C + 3] = 0;
    for (i = 0; i < TAB_C; i++) {
        out[i] = 0;
    }
    /* Enumerate lattice points under both constraints. */
    for (x = 0; x <= 15; x++) {
        for (y = 0; y <= 15; y++) {
            int u0 = tab[0 * TAB_C + 0] * x + tab[0 * TAB_C + 1] * y;
            int u1 = tab[1 * TAB_C + 0] * x + tab[1 * TAB_C + 1] * y;
            if (u0 <= tab[0 * TAB_C + 3] && u1 <= tab[1 * TAB_C + 3]) {
                int v = tab[2 * TAB_C + 0] * x + tab[2 * TAB_C + 1] * y;
                if (v > best) {
                    best = v;
                    best_x = x;
                    best_y = y;
                }
            }
        }
    }
    out[0] = best;
    out[1] = best_x;
    out[2] = best_y;
    free(tab);
    return best;
}
