/*
 * Singly linked list fold, regular C version. The list is laid out in
 * index-linked arrays and the fold is written as tail recursion, the
 * way a functional-minded programmer would put it.
 */

#define LIST_CAP 128

int list_val[LIST_CAP];
int list_next[LIST_CAP];

int list_sum(int head, int acc) {
    if (head < 0) {
        return acc;
    }
    return list_sum(list_next[head], acc + list_val[head]);
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
