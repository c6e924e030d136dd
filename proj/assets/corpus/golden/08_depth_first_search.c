/*
 * Depth-first preorder walk of an implicit binary tree, HLS-C version:
 * the recursion became an explicit bounded stack. Pushing the right
 * child first keeps the preorder intact.
 */

#define DFS_CAP 64
#define DFS_MAX_DEPTH 64

int dfs_left[DFS_CAP];
int dfs_right[DFS_CAP];
int dfs_val[DFS_CAP];
int dfs_out[DFS_CAP];
int dfs_pos = 0;

void dfs_visit(int node) {
    int stack[DFS_MAX_DEPTH];
    int sp = 0;
    if (node < 0) {
        return;
    }
    stack[sp] = node;
    sp = sp + 1;
    while (sp > 0) {
        int cur;
        sp = sp - 1;
        cur = stack[sp];
        if (cur < 0) {
            continue;
        }
        dfs_out[dfs_pos] = dfs_val[cur];
        dfs_pos = dfs_pos + 1;
        if (sp < DFS_MAX_DEPTH) {
            stack[sp] = dfs_right[cur];
            sp = sp + 1;
        }
        if (sp < DFS_MAX_DEPTH) {
            stack[sp] = dfs_left[cur];
            sp = sp + 1;
        }
    }
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
