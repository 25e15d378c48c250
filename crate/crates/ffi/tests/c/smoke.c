#include <stdio.h>
#include "fasclique.h"

int main(void) {
    FcTournament *t = NULL;
    if (fc_tournament_random(40, 3, 1, &t) != FC_STATUS_OK) return 1;
    FcPackingResult *r = NULL;
    if (fc_pack(t, NULL, 0, true, 2, 3, &r) != FC_STATUS_OK) return 2;
    if (fc_packing_is_success(r) != 1) return 3;
    size_t clique[3];
    if (fc_packing_clique(r, 0, clique) != FC_STATUS_OK) return 4;
    if (fc_tournament_random(4, 1, 0, &t) != FC_STATUS_PARAMETER) return 5;
    if (fc_last_error() == NULL) return 6;
    printf("%zu\n", fc_packing_num_cliques(r));
    fc_packing_free(r);
    return 0;
}
