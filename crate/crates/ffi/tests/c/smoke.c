#include <stdio.h>
#include <string.h>

#include "m1taut.h"

static int failures = 0;

#define CHECK(cond)                                                  \
    do {                                                             \
        if (!(cond)) {                                               \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            failures++;                                              \
        }                                                            \
    } while (0)

int main(void) {
    size_t betti[8];
    size_t len = 0;
    CHECK(m1taut_even_betti(4, true, betti, 8, &len) == M1TAUT_STATUS_OK);
    CHECK(len == 5);
    CHECK(betti[0] == 1 && betti[1] == 12 && betti[2] == 23 && betti[3] == 12 && betti[4] == 1);

    CHECK(m1taut_even_betti(4, true, betti, 2, &len) == M1TAUT_STATUS_BUFFER_TOO_SMALL);
    CHECK(len == 5);
    CHECK(m1taut_last_error_message() != NULL);

    M1tautCtPage *page = NULL;
    CHECK(m1taut_ct_page_new(4, 3, &page) == M1TAUT_STATUS_OK);
    uint64_t dim = 0, inv = 0;
    CHECK(m1taut_ct_page_entry(page, 2, 1, &dim, &inv) == M1TAUT_STATUS_OK);
    CHECK(inv == 5);
    CHECK(m1taut_ct_page_entry(page, 9, 9, &dim, &inv) == M1TAUT_STATUS_INVALID_ARGUMENT);
    m1taut_ct_page_free(page);

    M1tautGraph *g = NULL;
    const char *banana =
        "{\"vertices\":[{\"genus\":0},{\"genus\":0}],"
        "\"legs\":[{\"label\":1,\"vertex\":0},{\"label\":2,\"vertex\":1}],"
        "\"edges\":[[0,1],[0,1]]}";
    CHECK(m1taut_graph_from_json(banana, &g) == M1TAUT_STATUS_OK);
    uint64_t aut = 0;
    CHECK(m1taut_graph_automorphism_count(g, &aut) == M1TAUT_STATUS_OK);
    CHECK(aut == 2);
    char *json = NULL;
    CHECK(m1taut_graph_to_json(g, &json) == M1TAUT_STATUS_OK);
    CHECK(json != NULL && strstr(json, "vertices") != NULL);
    m1taut_string_free(json);
    m1taut_graph_free(g);

    CHECK(m1taut_graph_from_json("{", &g) == M1TAUT_STATUS_PARSE);
    CHECK(m1taut_ct_page_new(4, 7, &page) == M1TAUT_STATUS_INVALID_ARGUMENT);

    if (failures == 0) {
        printf("ok\n");
    }
    return failures == 0 ? 0 : 1;
}
