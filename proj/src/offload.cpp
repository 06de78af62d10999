#include "xbarsim/offload.h"

#include <algorithm>
#include <memory>
#include <mutex>

#include "xbarsim/tiler.hpp"

namespace {

std::mutex g_mutex;
std::unique_ptr<xbarsim::MatrixHandle> g_handle;

int translate(const std::exception& e) {
    if (dynamic_cast<const xbarsim::TileTooLarge*>(&e))
        return XBS_ERR_TOO_LARGE;
    if (dynamic_cast<const xbarsim::EncodingError*>(&e))
        return XBS_ERR_ENCODING;
    if (dynamic_cast<const xbarsim::ShapeError*>(&e) ||
        dynamic_cast<const xbarsim::ConfigError*>(&e))
        return XBS_ERR_BAD_ARG;
    return XBS_ERR_INTERNAL;
}

} // namespace

extern "C" {

int xbs_configure(const xbs_offload_config* cfg) {
    if (!cfg || !cfg->mapping)
        return XBS_ERR_BAD_ARG;
    std::lock_guard<std::mutex> lock(g_mutex);
    try {
        xbarsim::MappingScheme scheme = xbarsim::MappingScheme::from_name(cfg->mapping);
        xbarsim::CrossbarConfig xc;
        xc.rows_c = cfg->rows_c;
        xc.cols_c = cfg->cols_c;
        xc.i_hrs = cfg->i_hrs;
        xc.i_lrs = cfg->i_lrs;
        xc.sigma_hrs = cfg->sigma_hrs;
        xc.sigma_lrs = cfg->sigma_lrs;
        if (cfg->adc_bits > 0)
            xc.adc.resolution_bits = cfg->adc_bits;
        xc.adc.alpha = cfg->alpha;
        xc.seed = cfg->seed;
        xbarsim::TilerConfig tiles{cfg->m_int, cfg->n_int};
        g_handle = std::make_unique<xbarsim::MatrixHandle>(scheme, xc, tiles);
        return XBS_OK;
    } catch (const std::exception& e) {
        g_handle.reset();
        return translate(e);
    }
}

int write_matrix(int* m, int m_int, int n_int) {
    if (!m || m_int < 1 || n_int < 1)
        return XBS_ERR_BAD_ARG;
    std::lock_guard<std::mutex> lock(g_mutex);
    if (!g_handle)
        return XBS_ERR_NOT_CONFIGURED;
    try {
        xbarsim::IntMatrix mat(m_int, n_int);
        std::copy(m, m + static_cast<std::size_t>(m_int) * n_int, mat.data.begin());
        g_handle->write(mat);
        return XBS_OK;
    } catch (const std::exception& e) {
        return translate(e);
    }
}

int mvm(int* r, int* v, int m_int, int n_int) {
    if (!r || !v || m_int < 1 || n_int < 1)
        return XBS_ERR_BAD_ARG;
    std::lock_guard<std::mutex> lock(g_mutex);
    if (!g_handle)
        return XBS_ERR_NOT_CONFIGURED;
    if (g_handle->rows() != m_int || g_handle->cols() != n_int)
        return XBS_ERR_BAD_ARG;
    try {
        const std::vector<long long> out =
            g_handle->mvm(std::span<const int>(v, static_cast<std::size_t>(n_int)));
        for (int i = 0; i < m_int; ++i)
            r[i] = static_cast<int>(out[static_cast<std::size_t>(i)]);
        return XBS_OK;
    } catch (const std::exception& e) {
        return translate(e);
    }
}

int xbs_stats(long long* writes, long long* mvms) {
    std::lock_guard<std::mutex> lock(g_mutex);
    if (!g_handle)
        return XBS_ERR_NOT_CONFIGURED;
    if (writes)
        *writes = g_handle->stats().writes;
    if (mvms)
        *mvms = g_handle->stats().mvms;
    return XBS_OK;
}

} // extern "C"
