/*
 * Toy AES-flavored byte mixer: substitute, rotate, and xor rounds
 * driven by a round schedule, regular C version. The round dispatch
 * switch enumerates its four cases and has no default arm, which the
 * synthesis front end rejects for an int selector.
 */

#define AES_BLOCK 16

int sbox_lite[16] = {9, 4, 10, 11, 13, 1, 8, 5, 6, 2, 0, 3, 12, 14, 15, 7};

int aes_mix(int rounds, int state[], int out[]) {
    int i;
    int r;
    int acc = 0;
    for (i = 0; i < AES_BLOCK; i++) {
        out[i] = state[i] & 255;
    }
    for (r = 0; r < rounds; r++) {
        int sel = r % 4;
        switch (sel) {
        case 0:
            for (i = 0; i < AES_BLOCK; i++) {
                out[i] = (sbox_lite[out[i] & 15] << 4) | (out[i] >> 4);
            }
            break;
        case 1:
            for (i = 0; i < AES_BLOCK; i++) {
                out[i] = out[(i + 4) % AES_BLOCK];
            }
            break;
        case 2:
            for (i = 0; i < AES_BLOCK; i++) {
                out[i] = out[i] ^ sbox_lite[i];
            }
            break;
        case 3:
            for (i = 0; i < AES_BLOCK; i++) {
                out[i] = (out[i] + r) & 255;
            }
            break;
        }
    }
    for (i = 0; i < AES_BLOCK; i++) {
        acc = acc ^ out[i];
    }
    return acc;
}
