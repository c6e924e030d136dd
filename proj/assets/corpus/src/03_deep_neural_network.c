/*
 * Two-layer integer perceptron forward pass, regular C version. The
 * weight matrices are walked with a moving pointer the way tight CPU
 * loops are often written.
 */

#define IN_DIM 4
#define HID_DIM 6
#define OUT_DIM 2

int W1[IN_DIM * HID_DIM] = {
    3, -1, 2, 0, 1, -2, 4, 1, -3, 2, 0, 1,
    -1, 2, 1, -2, 3, 0, 2, -1, 1, 3, -2, 1,
};
int B1[HID_DIM] = {1, 0, -1, 2, 0, 1};
int W2[HID_DIM * OUT_DIM] = {
    2, -1, 1, 3, -2, 1, 0, 2, 1, -1, 2, 1,
};
int B2[OUT_DIM] = {0, 1};

int hidden[HID_DIM];

int dnn_forward(int x0, int x1, int x2, int x3, int out[]) {
    int x[IN_DIM];
    int i;
    int j;
    int *w = W1;
    x[0] = x0;
    x[1] = x1;
    x[2] = x2;
    x[3] = x3;
    for (j = 0; j < HID_DIM; j++) {
        int acc = B1[j];
        for (i = 0; i < IN_DIM; i++) {
            acc = acc + x[i] * *w;
            w = w + 1;
        }
        if (acc < 0) {
            acc = 0;
        }
        hidden[j] = acc;
    }
    w = W2;
    for (j = 0; j < OUT_DIM; j++) {
        int acc = B2[j];
        for (i = 0; i < HID_DIM; i++) {
            acc = acc + hidden[i] * *w;
            w = w + 1;
        }
        out[j] = acc;
    }
    return out[0] > out[1] ? 0 : 1;
}
