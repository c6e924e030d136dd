/*
 * 1-nearest-neighbor classifier on the integer plane, regular C
 * version. The distance scratchpad is sized at run time, so it is
 * allocated on the heap.
 */
#include <stdlib.h>

int knn_classify(int n, int xs[], int ys[], int labels[], int qx, int qy) {
    int *dist = (int *)malloc(n * sizeof(int));
    int i;
    int best = 0;
    int best_label = -1;
    for (i = 0; i < n; i++) {
        int dx = xs[i] - qx;
        int dy = ys[i] - qy;
        dist[i] = dx * dx + dy * dy;
    }
    for (i = 0; i < n; i++) {
        if (best_label < 0 || dist[i] < best) {
            best = dist[i];
            best_label = labels[i];
        }
    }
    free(dist);
    return best_label;
}
