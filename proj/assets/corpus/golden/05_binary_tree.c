/*
 * Binary search tree membership, HLS-C version: nodes live in a fixed
 * pool and children are indices, -1 meaning absent.
 */

#define BT_POOL_CAP 64

struct BTNode {
    int left;
    int right;
    int key;
};

struct BTNode bt_pool[BT_POOL_CAP];
int bt_used = 0;

int bt_insert(int root, int key) {
    int fresh;
    int cur;
    if (bt_used >= BT_POOL_CAP) {
        return root;
    }
    fresh = bt_used;
    bt_used = bt_used + 1;
    bt_pool[fresh].left = -1;
    bt_pool[fresh].right = -1;
    bt_pool[fresh].key = key;
    if (root < 0) {
        return fresh;
    }
    cur = root;
    while (1) {
        if (key < bt_pool[cur].key) {
            if (bt_pool[cur].left < 0) {
                bt_pool[cur].left = fresh;
                break;
            }
            cur = bt_pool[cur].left;
        } else {
            if (bt_pool[cur].right < 0) {
                bt_pool[cur].right = fresh;
                break;
            }
            cur = bt_pool[cur].right;
        }
    }
    return root;
}

int bt_contains(int root, int key) {
    int cur = root;
    while (cur >= 0) {
        if (bt_pool[cur].key == key) {
            return 1;
        }
        if (key < bt_pool[cur].key) {
            cur = bt_pool[cur].left;
        } else {
            cur = bt_pool[cur].right;
        }
    }
    return 0;
}

int tree_lookup(int n, int keys[], int queries[], int out[]) {
    int root = -1;
    int i;
    int hits = 0;
    bt_used = 0;
    for (i = 0; i < n; i++) {
        root = bt_insert(root, keys[i]);
    }
    for (i = 0; i < 16; i++) {
        out[i] = bt_contains(root, queries[i]);
        hits = hits + out[i];
    }
    return hits;
}
