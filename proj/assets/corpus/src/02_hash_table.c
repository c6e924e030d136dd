/*
 * Open-addressing hash table, regular C version: slot access goes
 * through a pointer temporary.
 */

#define TABLE_SIZE 61

int table[TABLE_SIZE];
int taken[TABLE_SIZE];

static int probe(int key) {
    int h = key % TABLE_SIZE;
    if (h < 0) {
        h = h + TABLE_SIZE;
    }
    return h;
}

int hash_store(int n, int keys[], int out[]) {
    int i;
    int stored = 0;
    for (i = 0; i < TABLE_SIZE; i++) {
        table[i] = 0;
        taken[i] = 0;
    }
    for (i = 0; i < n; i++) {
        int h = probe(keys[i]);
        int tries = 0;
        while (taken[h] && tries < TABLE_SIZE) {
            h = (h + 1) % TABLE_SIZE;
            tries = tries + 1;
        }
        if (tries < TABLE_SIZE) {
            int *slot = &table[h];
            *slot = keys[i];
            taken[h] = 1;
            stored = stored + 1;
        }
    }
    for (i = 0; i < n; i++) {
        int h = probe(keys[i]);
        int tries = 0;
        int found = 0;
        while (taken[h] && tries < TABLE_SIZE) {
            if (table[h] == keys[i]) {
                found = 1;
                break;
            }
            h = (h + 1) % TABLE_SIZE;
            tries = tries + 1;
        }
        out[i] = found;
    }
    return stored;
}
