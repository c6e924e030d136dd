/*
 * Perceptron-style training loop for a linear separator, regular C
 * version. The "keep going" flag is a bool that gets bumped with the
 * increment operator whenever a sample is misclassified.
 */

#define SVM_EPOCHS 24

int svm_train(int n, int xs[], int ys[], int labels[]) {
    int w0 = 0;
    int w1 = 0;
    int bias = 0;
    int epoch = 0;
    bool updated = true;
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
                updated++;
            }
        }
        epoch = epoch + 1;
    }
    return w0 * 1000000 + w1 * 1000 + bias + epoch;
}
