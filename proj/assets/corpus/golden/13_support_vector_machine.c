/*
 * Perceptron-style training loop for a linear separator, HLS-C
 * version: the flag is an integer and the bump is a plain add.
 */

#define SVM_EPOCHS 24

int svm_train(int n, int xs[], int ys[], int labels[]) {
    int w0 = 0;
    int w1 = 0;
    int bias = 0;
    int epoch = 0;
    int updated = true;
    while (updated && epoch < SVM_EPOCHS) {
        int i;
        updated = false;
        for (i = 0; i < n; i++) {
            int score = w0 * xs[i] + w1 * ys[i] + bias;
            int predicted = score >= 0 ? 1 : -1;
            if (predicted != labels[i]) {
                w0 = w0 + labels[i] * xs[i];
                w1 = w1 + labels[i] * ys[i];
                bias = bias + labels[i];
                updated = updated + 1;
            }
        }
        epoch = epoch + 1;
    }
    return w0 * 1000000 + w1 * 1000 + bias + epoch;
}
