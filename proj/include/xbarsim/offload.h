/* C offload interface: the stable write_matrix/mvm surface an external
 * compiler links against. Row-major layout, n-dimension fastest.
 * All functions return 0 on success, a nonzero error code otherwise. */
#ifndef XBARSIM_OFFLOAD_H
#define XBARSIM_OFFLOAD_H

#ifdef __cplusplus
extern "C" {
#endif

enum xbs_status {
    XBS_OK = 0,
    XBS_ERR_NOT_CONFIGURED = 1,
    XBS_ERR_BAD_ARG = 2,
    XBS_ERR_ENCODING = 3,
    XBS_ERR_TOO_LARGE = 4,
    XBS_ERR_INTERNAL = 5
};

typedef struct xbs_offload_config {
    const char* mapping; /* e.g. "bnn-i", "tnn-iv+cycles" */
    int rows_c;
    int cols_c;
    int m_int; /* 0 = largest tile that fits */
    int n_int;
    double i_hrs;
    double i_lrs;
    double sigma_hrs;
    double sigma_lrs;
    int adc_bits;  /* <= 0 = infinite resolution */
    double alpha;
    unsigned long long seed;
} xbs_offload_config;

/* Must be called before write_matrix/mvm. Resets any previous state. */
int xbs_configure(const xbs_offload_config* cfg);

/* Copy m_int x n_int matrix m to crossbar. */
int write_matrix(int* m, int m_int, int n_int);

/* Execute MVM operation: r = m * v. Uses the matrix from the previous
 * write_matrix; results are written to r (length m_int). */
int mvm(int* r, int* v, int m_int, int n_int);

int xbs_stats(long long* writes, long long* mvms);

#ifdef __cplusplus
}
#endif

#endif /* XBARSIM_OFFLOAD_H */
