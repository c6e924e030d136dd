/*
 * 1-nearest-neighbor classifier on the integer plane, HLS-C version:
 * the scratchpad has a fixed capacity covering the largest dataset.
 */

#define KNN_MAX_N 128

int knn_classify(int n, int xs[], int ys[], int labels[], int qx, int qy) {
    int dist[KNN_MAX_N];
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
    return best_label;
}
