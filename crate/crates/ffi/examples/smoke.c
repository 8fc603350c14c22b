/* cc examples/smoke.c -Iinclude -L../../target/debug -l:libpolmulti_ffi.a -lm -lpthread -ldl -o smoke */
#include <stdio.h>
#include "polmulti.h"

int main(void) {
    const double p[4] = {1.0 / 3.0, 0.0, 0.5, 1.0 / 6.0};
    PmSector *s = NULL;
    PmSpectrum *sp = NULL;
    double purity = 0.0;
    size_t order = 0;

    if (pm_sector_diagonal(3, p, 4, &s) != PM_STATUS_OK) {
        fprintf(stderr, "%s\n", pm_last_error());
        return 1;
    }
    pm_sector_purity(s, &purity);
    pm_spectrum_new(s, &sp);
    pm_spectrum_unpolarization_order(sp, 1e-10, &order);
    printf("purity=%.12f order=%zu\n", purity, order);

    if (pm_sector_fock(3, 2, &s) != PM_STATUS_INVALID_ARGUMENT) return 2;
    pm_spectrum_free(sp);
    pm_sector_free(s);
    return 0;
}
