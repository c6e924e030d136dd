/*
 * Greedy coin changer for amounts under ten dollars. Synthesizable as
 * written; the counters are all plain 32-bit integers.
 */

int coin_value[5] = {100, 25, 10, 5, 1};

int greedy_coins(int amount, int out[]) {
    int i;
    int remaining = amount;
    int total = 0;
    for (i = 0; i < 5; i++) {
        int cnt = remaining / coin_value[i];
        out[i] = cnt;
        remaining = remaining - cnt * coin_value[i];
        total = total + cnt;
    }
    return total;
}
