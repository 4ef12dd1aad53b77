#include <stdio.h>
#include "bartnik.h"

int main(void) {
    BartnikReport *report = NULL;
    if (bartnik_geometry_verify("minkowski", 1, &report) != BARTNIK_STATUS_OK) {
        fprintf(stderr, "%s\n", bartnik_last_error());
        return 2;
    }
    int ok = bartnik_report_passed(report);
    printf("bartnik %s: %zu checks, %s\n", bartnik_version(), bartnik_report_check_count(report), ok ? "pass" : "fail");
    bartnik_report_free(report);

    BartnikBoundaryData *data = NULL;
    BartnikSolution *solution = NULL;
    double x[3] = {0.0, 0.0, 2.0};
    double values[11];
    if (bartnik_data_zero(0, &data) != BARTNIK_STATUS_OK) return 2;
    if (bartnik_solve(data, 2, 1, &solution) != BARTNIK_STATUS_OK) return 2;
    if (bartnik_solution_eval(solution, x, values) != BARTNIK_STATUS_OK) return 2;
    bartnik_solution_free(solution);
    bartnik_data_free(data);
    return ok && values[0] == 0.0 ? 0 : 1;
}
