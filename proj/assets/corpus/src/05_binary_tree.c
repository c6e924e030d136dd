/*
 * Binary search tree membership, regular C version: nodes come from
 * the heap one at a time and carry child pointers.
 */
#include <stdlib.h>

struct BTNode {
    struct BTNode *left;
    struct BTNode *right;
    int key;
};

struct BTNode *bt_insert(struct BTNode *root, int key) {
    struct BTNode *fresh = (struct BTNode *)malloc(sizeof(struct BTNode));
    struct BTNode *cur;
    fresh->left = NULL;
    fresh->right = NULL;
    fresh->key = key;
    if (root == NULL) {
        return fresh;
    }
    cur = root;
    while (1) {
        if (key < cur->key) {
            if (cur->left == NULL) {
                cur->left = fresh;
                break;
            }
            cur = cur->left;
        } else {
            if (cur->right == NULL) {
                cur->right = fresh;
                break;
            }
            cur = cur->right;
        }
    }
    return root;
}

int bt_contains(struct BTNode *root, int key) {
    struct BTNode *cur = root;
    while (cur != NULL) {
        if (cur->key == key) {
            return 1;
        }
        if (key < cur->key) {
            cur = cur->left;
        } else {
            cur = cur->right;
        }
    }
    return 0;
}

int tree_lookup(int n, int keys[], int queries[], int out[]) {
    struct BTNode *root = NULL;
    int i;
    int hits = 0;
    for (i = 0; i < n; i++) {
        root = bt_insert(root, keys[i]);
    }
    for (i = 0; i < 16; i++) {
        out[i] = bt_contains(root, queries[i]);
        hits = hits + out[i];
    }
    return hits;
}
