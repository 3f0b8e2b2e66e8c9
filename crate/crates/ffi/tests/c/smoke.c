#include <stdio.h>
#include <string.h>
#include "singseries.h"

int main(void) {
    SsPrimeTable *t = NULL;
    if (ss_prime_table_new(100, &t) != SS_STATUS_OK || ss_prime_table_len(t) != 25) return 1;
    ss_prime_table_free(t);

    uint64_t h[2] = {1, 3};
    SsEulerValue v;
    if (ss_singular_series_tuple(h, 2, 100000, &v) != SS_STATUS_OK || !v.rigorous) return 2;
    if (v.value < 1.3203 || v.value > 1.3204) return 3;

    SsFamily *f = NULL;
    if (ss_family_parse("x,x+2", &f) != SS_STATUS_OK) return 4;
    uint64_t count = 0;
    if (ss_family_count_seeds(f, 100, &count) != SS_STATUS_OK || count != 8) return 5;
    ss_family_free(f);

    if (ss_family_parse("x+", &f) != SS_STATUS_INVALID_PARAMETER) return 6;
    if (ss_last_error_message() == NULL) return 7;

    char *q = NULL;
    if (ss_nonvanishing_probability(3, &q) != SS_STATUS_OK || strcmp(q, "7/36") != 0) return 8;
    ss_string_free(q);
    printf("ok %s\n", ss_version());
    return 0;
}
