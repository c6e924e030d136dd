/*
 * Depth-first preorder walk of an implicit binary tree, regular C
 * version: the walk calls itself for both children.
 */

#define DFS_CAP 64

int dfs_left[DFS_CAP];
int dfs_right[DFS_CAP];
int dfs_val[DFS_CAP];
int dfs_out[DFS_CAP];
int dfs_pos = 0;

void dfs_visit(int node) {
    if (node < 0) {
        return;
    }
    dfs_out[dfs_pos] = dfs_val[node];
    dfs_pos = dfs_pos + 1;
    dfs_visit(dfs_left[node]);
    dfs_visit(dfs_right[node]);
}

int dfs_preorder(int n, int out[]) {
    int i;
    for (i = 0; i < DFS_CAP; i++) {
        dfs_left[i] = 2 * i + 1 < n ? 2 * i + 1 : -1;
        dfs_right[i] = 2 * i + 2 < n ? 2 * i + 2 : -1;
        dfs_val[i] = (i * 37 + 11) % 100;
    }
    dfs_pos = 0;
    if (n > 0) {
        dfs_visit(0);
    }
    for (i = 0; i < dfs_pos; i++) {
        out[i] = dfs_out[i];
    }
    return dfs_pos;
}
