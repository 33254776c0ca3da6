#include <stdio.h>
#include "surfnav.h"
int main(void) {
    SnGrid *g = NULL; SnSurface *s = NULL; SnPath *p = NULL;
    if (sn_grid_from_preset("spiral_ramp", 0.2, &g) != SN_STATUS_OK) return 1;
    double pose[3] = {9, 5, 0.5}, goal[3] = {3.5, 5, 6.9};
    if (sn_surface_extract(g, pose, 1.0, NULL, &s) != SN_STATUS_OK) { puts(sn_last_error_message()); return 2; }
    SnStatus st = sn_plan(s, pose, goal, 2.0, NULL, &p);
    if (st != SN_STATUS_OK) { puts(sn_last_error_message()); return 3; }
    printf("states=%zu path=%zu cost=%.3f len=%.3f\n", sn_surface_len(s), sn_path_len(p), sn_path_cost(p), sn_path_length(p));
    sn_path_free(p); sn_surface_free(s); sn_grid_free(g);
    return 0;
}
