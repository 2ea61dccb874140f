/* NTT kernels for _core.pyx. Montgomery arithmetic with R = 2^32 and
 * p < 2^31; values are kept fully reduced in [0, p). Kept in C so the
 * butterfly loops vectorize. */
#ifndef REGULUS_NTT_H
#define REGULUS_NTT_H
#include <stdint.h>
#include <stddef.h>

#define RG_SMALL_LOG 15
#define RG_SMALL ((size_t)1 << RG_SMALL_LOG)

static inline uint32_t rg_mred(uint64_t t, uint32_t p, uint32_t pinv)
{
    uint32_t q = (uint32_t)t * pinv;
    uint64_t r = (t + (uint64_t)q * p) >> 32;
    return (uint32_t)(r >= p ? r - p : r);
}

/* Barrett reduction of x < 2^64 by a runtime modulus m >= 2;
 * minv = floor((2^64 - 1) / m). */
static inline uint64_t rg_modm(uint64_t x, uint64_t m, uint64_t minv)
{
    uint64_t q = (uint64_t)(((unsigned __int128)x * minv) >> 64);
    uint64_t r = x - q * m;
    return r >= m ? r - m : r;
}

static inline void rg_dif_layer(uint32_t *restrict x, uint32_t *restrict y,
                                const uint32_t *restrict w, size_t h,
                                uint32_t p, uint32_t pinv)
{
    for (size_t j = 0; j < h; j++) {
        uint32_t u = x[j], v = y[j];
        uint32_t s = u + v;
        uint32_t d = u - v + (u < v ? p : 0);
        x[j] = s >= p ? s - p : s;
        y[j] = rg_mred((uint64_t)d * w[j], p, pinv);
    }
}

static inline void rg_dit_layer(uint32_t *restrict x, uint32_t *restrict y,
                                const uint32_t *restrict w, size_t h,
                                uint32_t p, uint32_t pinv)
{
    for (size_t j = 0; j < h; j++) {
        uint32_t u = x[j];
        uint32_t v = rg_mred((uint64_t)y[j] * w[j], p, pinv);
        uint32_t s = u + v;
        x[j] = s >= p ? s - p : s;
        y[j] = u - v + (u < v ? p : 0);
    }
}

/* fixed-width stages; the generic layer call is too short to pay off here */
#define RG_SMALL_STAGES(H)                                                    \
static inline void rg_dif_h##H(uint32_t *restrict a, size_t n,                \
                               const uint32_t *restrict w,                    \
                               uint32_t p, uint32_t pinv)                     \
{                                                                             \
    for (size_t s = 0; s < n; s += 2 * H)                                     \
        for (size_t j = 0; j < H; j++) {                                      \
            uint32_t u = a[s + j], v = a[s + j + H];                          \
            uint32_t t = u + v;                                               \
            uint32_t d = u - v + (u < v ? p : 0);                             \
            a[s + j] = t >= p ? t - p : t;                                    \
            a[s + j + H] = rg_mred((uint64_t)d * w[j], p, pinv);              \
        }                                                                     \
}                                                                             \
static inline void rg_dit_h##H(uint32_t *restrict a, size_t n,                \
                               const uint32_t *restrict w,                    \
                               uint32_t p, uint32_t pinv)                     \
{                                                                             \
    for (size_t s = 0; s < n; s += 2 * H)                                     \
        for (size_t j = 0; j < H; j++) {                                      \
            uint32_t u = a[s + j];                                            \
            uint32_t v = rg_mred((uint64_t)a[s + j + H] * w[j], p, pinv);     \
            uint32_t t = u + v;                                               \
            a[s + j] = t >= p ? t - p : t;                                    \
            a[s + j + H] = u - v + (u < v ? p : 0);                           \
        }                                                                     \
}
RG_SMALL_STAGES(1)
RG_SMALL_STAGES(2)
RG_SMALL_STAGES(4)
RG_SMALL_STAGES(8)

/* tw[j] = w^j, Montgomery form; one = R mod p */
static inline void rg_fill_powers(uint32_t *tw, size_t h, uint32_t w,
                                  uint32_t one, uint32_t p, uint32_t pinv)
{
    tw[0] = one;
    for (size_t j = 1; j < h; j++)
        tw[j] = rg_mred((uint64_t)tw[j - 1] * w, p, pinv);
}

static void rg_dif_block(uint32_t *x, size_t blk, const uint32_t *small_tw,
                         uint32_t p, uint32_t pinv)
{
    size_t h, j;
    for (h = blk >> 1; h >= 16; h >>= 1)
        for (j = 0; j < blk; j += 2 * h)
            rg_dif_layer(x + j, x + j + h, small_tw + h, h, p, pinv);
    if (blk >= 16) rg_dif_h8(x, blk, small_tw + 8, p, pinv);
    if (blk >= 8) rg_dif_h4(x, blk, small_tw + 4, p, pinv);
    if (blk >= 4) rg_dif_h2(x, blk, small_tw + 2, p, pinv);
    if (blk >= 2) rg_dif_h1(x, blk, small_tw + 1, p, pinv);
}

static void rg_dit_block(uint32_t *x, size_t blk, const uint32_t *small_tw,
                         uint32_t p, uint32_t pinv)
{
    size_t h, j;
    if (blk >= 2) rg_dit_h1(x, blk, small_tw + 1, p, pinv);
    if (blk >= 4) rg_dit_h2(x, blk, small_tw + 2, p, pinv);
    if (blk >= 8) rg_dit_h4(x, blk, small_tw + 4, p, pinv);
    if (blk >= 16) rg_dit_h8(x, blk, small_tw + 8, p, pinv);
    for (h = 16; h < blk; h <<= 1)
        for (j = 0; j < blk; j += 2 * h)
            rg_dit_layer(x + j, x + j + h, small_tw + h, h, p, pinv);
}

/* Forward transform, natural order in, scrambled order out. roots[s] is a
 * primitive 2^s-th root of unity and small_tw[h + j] = w_{2h}^j for
 * 2h <= RG_SMALL, all in Montgomery form. tw is scratch of n/2 words. */
static void rg_ntt_dif(uint32_t *a, size_t n, uint32_t *tw,
                       const uint32_t *roots, const uint32_t *small_tw,
                       uint32_t one, uint32_t p, uint32_t pinv)
{
    size_t h = n >> 1, s, lg = 0, blk;
    while (((size_t)1 << lg) < n) lg++;
    /* stages wider than a cache block stream over the whole array */
    for (; h >= 1 && 2 * h > RG_SMALL; h >>= 1, lg--) {
        rg_fill_powers(tw, h, roots[lg], one, p, pinv);
        for (s = 0; s < n; s += 2 * h)
            rg_dif_layer(a + s, a + s + h, tw, h, p, pinv);
    }
    blk = n < RG_SMALL ? n : RG_SMALL;
    for (s = 0; s < n; s += blk)
        rg_dif_block(a + s, blk, small_tw, p, pinv);
}

/* Inverse of rg_ntt_dif up to the factor n. */
static void rg_ntt_dit(uint32_t *a, size_t n, uint32_t *tw,
                       const uint32_t *iroots, const uint32_t *small_tw,
                       uint32_t one, uint32_t p, uint32_t pinv)
{
    size_t h, s, lg, blk = n < RG_SMALL ? n : RG_SMALL;
    for (s = 0; s < n; s += blk)
        rg_dit_block(a + s, blk, small_tw, p, pinv);
    lg = 0;
    while (((size_t)1 << lg) < 2 * blk) lg++;
    for (h = blk; h < n; h <<= 1, lg++) {
        rg_fill_powers(tw, h, iroots[lg], one, p, pinv);
        for (s = 0; s < n; s += 2 * h)
            rg_dit_layer(a + s, a + s + h, tw, h, p, pinv);
    }
}

static inline void rg_pointwise(uint32_t *restrict x, const uint32_t *restrict y,
                                size_t n, uint32_t p, uint32_t pinv)
{
    for (size_t j = 0; j < n; j++)
        x[j] = rg_mred((uint64_t)x[j] * y[j], p, pinv);
}

static inline void rg_scale(uint32_t *restrict x, uint32_t c, size_t n,
                            uint32_t p, uint32_t pinv)
{
    for (size_t j = 0; j < n; j++)
        x[j] = rg_mred((uint64_t)x[j] * c, p, pinv);
}

#endif
