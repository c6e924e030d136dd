/*
 * Breadth-first visit over a binary search tree, HLS-C version.
 *
 * Same behavior as the regular C benchmark: nodes live in a statically
 * sized pool and are addressed by index, and the visitor drives an
 * explicit stack instead of calling itself. -1 plays the role the null
 * pointer played.
 */
#include <stdio.h>

#define POOL_CAP 512
#define BFS_MAX_DEPTH 512

struct TreeNode {
    int left;
    int right;
    int val;
};

struct TreeNode Pool[POOL_CAP];
int pool_used = 0;

static unsigned int lcg_state = 1u;
unsigned int m = 0u;

unsigned int lcg_next() {
    lcg_state = lcg_state * 1103515245u + 12345u;
    return (lcg_state >> 16) & 0x7fff;
}

int make_node(int v) {
    int idx;
    if (pool_used >= POOL_CAP) {
        return -1;
    }
    idx = pool_used;
    pool_used = pool_used + 1;
    Pool[idx].left = -1;
    Pool[idx].right = -1;
    Pool[idx].val = v;
    return idx;
}

/* Standard binary-search-tree insertion; duplicates go right. */
int tree_insert(int root, int v) {
    int cur;
    if (root < 0) {
        return make_node(v);
    }
    cur = root;
    while (1) {
        if (v < Pool[cur].val) {
            if (Pool[cur].left < 0) {
                Pool[cur].left = make_node(v);
                break;
            }
            cur = Pool[cur].left;
        } else {
            if (Pool[cur].right < 0) {
                Pool[cur].right = make_node(v);
                break;
            }
            cur = Pool[cur].right;
        }
    }
    return root;
}

/*
 * Visit the subtree rooted at node using an explicit bounded stack.
 * Pushing the right child first keeps the visit order identical to the
 * recursive form: node, left subtree, right subtree.
 */
void BFS(int node, int out[]) {
    int stack[BFS_MAX_DEPTH];
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
        out[m] = Pool[cur].val;
        m = m + 1u;
        if (sp < BFS_MAX_DEPTH) {
            stack[sp] = Pool[cur].right;
            sp = sp + 1;
        }
        if (sp < BFS_MAX_DEPTH) {
            stack[sp] = Pool[cur].left;
            sp = sp + 1;
        }
    }
}

/*
 * One benchmark case: build a tree of n nodes from the seeded stream,
 * visit every node, and report how many nodes were seen. Releasing the
 * tree is resetting the pool cursor.
 */
unsigned int run_case(int n, unsigned int seed, int out[]) {
    int root = -1;
    int i;
    lcg_state = seed;
    m = 0u;
    pool_used = 0;
    for (i = 0; i < n; i++) {
        int v = (int)(lcg_next() % 1000u);
        root = tree_insert(root, v);
    }
    BFS(root, out);
    return m;
}
