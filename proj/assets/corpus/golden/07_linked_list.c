/*
 * Singly linked list fold, HLS-C version: the tail recursion became a
 * loop over the successor chain.
 */

#define LIST_CAP 128

int list_val[LIST_CAP];
int list_next[LIST_CAP];

int list_sum(int head, int acc) {
    while (head >= 0) {
        acc = acc + list_val[head];
        head = list_next[head];
    }
    return acc;
}

int sum_list(int n, int vals[]) {
    int i;
    int head = -1;
    /* Build the chain back to front so node 0 is the head. */
    for (i = n - 1; i >= 0; i--) {
        list_val[i] = vals[i];
        list_next[i] = head;
        head = i;
    }
    return list_sum(head, 0);
}
