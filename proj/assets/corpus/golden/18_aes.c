/*
 * Toy AES-flavored byte mixer, HLS-C version: the round dispatch
 * switch closes the selector range with a default arm.
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
        default:
            break;
        }
    }
    for (i = 0; i < AES_BLOCK; i++) {
        acc = acc ^ out[i];
    }
    return acc;
}
