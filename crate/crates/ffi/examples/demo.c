#include <stdio.h>
#include <stdlib.h>
#include "wlab.h"

int main(int argc, char **argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: %s DATA.json\n", argv[0]);
        return 1;
    }
    FILE *f = fopen(argv[1], "rb");
    if (!f) {
        perror(argv[1]);
        return 1;
    }
    static char buf[1 << 16];
    size_t n = fread(buf, 1, sizeof buf - 1, f);
    fclose(f);
    buf[n] = 0;

    WlabData *d = NULL;
    if (wlab_data_from_json(buf, &d) != WLAB_STATUS_OK) {
        fprintf(stderr, "error: %s\n", wlab_last_error());
        return 1;
    }
    double lambda2 = 0.0, k = 0.0;
    int64_t num = 0, den = 1;
    wlab_metric_factor(d, 0.5, 0.5, &lambda2);
    wlab_gauss_curvature(d, 0.5, 0.5, &k);
    enum WlabStatus s = wlab_nu_f(d, 1, &num, &den);
    printf("punctures %zu, lambda^2 %.6g, K %.6g", wlab_data_puncture_count(d), lambda2, k);
    if (s == WLAB_STATUS_OK)
        printf(", nu_f(g1) %lld/%lld", (long long)num, (long long)den);
    printf("\n");
    wlab_data_free(d);
    return 0;
}
