#include <stdio.h>
#include <string.h>

#include "lgla.h"

int main(void) {
    LglaStructure *h = NULL;
    if (lgla_construct("wpi", "1,0;0,i", 2, &h) != LGLA_STATUS_OK) {
        fprintf(stderr, "construct: %s\n", lgla_last_error());
        return 1;
    }
    uint64_t violations = 1;
    if (lgla_check_jacobi(h, &violations) != LGLA_STATUS_OK || violations != 0) {
        return 2;
    }
    int64_t lam[2] = {1, 0}, mu[2] = {0, 1};
    char *c = NULL;
    if (lgla_coefficient(h, lam, mu, 2, &c) != LGLA_STATUS_OK) {
        return 3;
    }
    printf("c=%s\n", c);
    lgla_string_free(c);
    LglaClassKind kind;
    if (lgla_classify(h, &kind, NULL) != LGLA_STATUS_OK || kind != LGLA_CLASS_KIND_NON_INTEGRABLE) {
        return 4;
    }
    lgla_structure_free(h);
    if (lgla_construct("nope", NULL, 1, &h) != LGLA_STATUS_PARSE || strlen(lgla_last_error()) == 0) {
        return 5;
    }
    return 0;
}
