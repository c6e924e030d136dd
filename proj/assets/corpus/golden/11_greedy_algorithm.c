/*
 * Greedy coin changer for amounts under ten dollars, HLS-C version:
 * counters are sized to their observed ranges.
 */

int coin_value[5] = {100, 25, 10, 5, 1};

int greedy_coins(ac_int<10, false> amount, int out[]) {
    ac_int<3, false> i;
    ac_int<11, true> remaining = amount;
    ac_int<5, false> total = 0;
    for (i = 0; i < 5; i++) {
        ac_int<4, false> cnt = remaining / coin_value[i];
        out[i] = cnt;
        remaining = remaining - cnt * coin_value[i];
        total = total + cnt;
    }
    return total;
}
