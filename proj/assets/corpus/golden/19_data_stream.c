/*
 * Streaming min/max/sum statistics, HLS-C version: the stats record is
 * a plain aggregate; the unused virtual hook is gone.
 */

struct StreamStats {
    int mn;
    int mx;
    int sum;
};

struct StreamStats live;

int stream_stats(int n, int xs[], int out[]) {
    int i;
    live.mn = 0;
    live.mx = 0;
    live.sum = 0;
    for (i = 0; i < n; i++) {
        int v = xs[i];
        if (i == 0 || v < live.mn) {
            live.mn = v;
        }
        if (i == 0 || v > live.mx) {
            live.mx = v;
        }
        live.sum = live.sum + v;
    }
    out[0] = live.mn;
    out[1] = live.mx;
    out[2] = live.sum;
    return live.sum;
}
