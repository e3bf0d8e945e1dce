#include <math.h>
#include <stdio.h>
#include "feshbach.h"

int main(void) {
    double eta = 0.0;
    if (fb_adiabatic_efficiency(1.0, 0.8, 3, &eta) != FB_STATUS_OK) return 1;
    if (fabs(eta - (1.0 - pow(0.8, 0.4))) > 1e-14) return 2;

    FbProtocol *p = NULL;
    if (fb_protocol_new(1.0, 0.8, 0.1, 3, FB_PROTOCOL_KIND_TRA, &p) != FB_STATUS_OK) return 3;
    double g = 0.0;
    if (fb_protocol_interaction(p, 0.1, &g) != FB_STATUS_OK || fabs(g - 0.8) > 1e-12) return 4;
    fb_protocol_free(p);

    double mu = 0.0;
    if (fb_chemical_potential(1e4, -1.0, 1, &mu) != FB_STATUS_DOMAIN) return 5;
    if (fb_last_error_message() == NULL) return 6;

    printf("ok %.6f\n", eta);
    return 0;
}
