#include <stdio.h>
#include <string.h>
#include "densops.h"

int main(void) {
    DensopsOperator *op = NULL, *lift = NULL;
    char *text = NULL;
    if (densops_operator_parse("x1*d1*d1", 1, &op) != DENSOPS_STATUS_OK) return 1;
    if (densops_lift_canonical2(op, "2", &lift) != DENSOPS_STATUS_OK) return 2;
    if (densops_operator_to_string(lift, &text) != DENSOPS_STATUS_OK) return 3;
    int ok = strcmp(text, "x1*d1^2 + 4/3*d1 - 2/3*d1*w") == 0;
    densops_string_free(text);
    densops_operator_free(lift);
    if (densops_lift_canonical2(op, "1/2", &lift) != DENSOPS_STATUS_E_SINGULAR_WEIGHT) return 4;
    printf("%s\n", densops_last_error_message());
    densops_operator_free(op);
    return ok ? 0 : 5;
}
