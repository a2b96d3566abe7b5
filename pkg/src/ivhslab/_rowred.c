/* In-place Gaussian elimination over F_p for odd primes p < 2^62.
 *
 * Matrices arrive as writable C-contiguous uint64 buffers of normal residues
 * (row-major, rows*cols items, every entry < p).  Internally everything runs
 * in Montgomery form so the only divisions are one exact shift per product.
 * Pivot selection is "first nonzero entry in the column", matching the pure
 * Python fallback bit for bit where outputs are canonical (RREF is unique).
 */
#define PY_SSIZE_T_CLEAN
#include <Python.h>
#include <stdint.h>

typedef unsigned __int128 u128;

typedef struct {
    uint64_t p;
    uint64_t npinv; /* -p^{-1} mod 2^64 */
    uint64_t r1;    /* 2^64 mod p  (Montgomery image of 1) */
    uint64_t r2;    /* 2^128 mod p (conversion factor)     */
} mont_t;

static void
mont_init(mont_t *m, uint64_t p)
{
    uint64_t inv = p; /* Newton iteration for p^{-1} mod 2^64, p odd */
    int i;
    for (i = 0; i < 5; i++)
        inv *= 2 - p * inv;
    m->p = p;
    m->npinv = (uint64_t)(0 - inv);
    m->r1 = (uint64_t)((((u128)1) << 64) % p);
    m->r2 = (uint64_t)(((u128)m->r1 * m->r1) % p);
}

static inline uint64_t
mont_mul(const mont_t *m, uint64_t a, uint64_t b)
{
    u128 t = (u128)a * b;
    uint64_t lo = (uint64_t)t;
    uint64_t red = lo * m->npinv;
    u128 u = t + (u128)red * m->p;
    uint64_t r = (uint64_t)(u >> 64);
    return (r >= m->p) ? r - m->p : r;
}

static uint64_t
mont_pow(const mont_t *m, uint64_t base, uint64_t exp)
{
    uint64_t acc = m->r1; /* Montgomery 1 */
    while (exp) {
        if (exp & 1)
            acc = mont_mul(m, acc, base);
        base = mont_mul(m, base, base);
        exp >>= 1;
    }
    return acc;
}

static inline uint64_t
sub_mod(uint64_t a, uint64_t b, uint64_t p)
{
    return (a >= b) ? a - b : a + p - b;
}

static void
swap_rows(uint64_t *a, Py_ssize_t cols, Py_ssize_t r1, Py_ssize_t r2)
{
    uint64_t *x = a + r1 * cols, *y = a + r2 * cols, t;
    Py_ssize_t j;
    if (r1 == r2)
        return;
    for (j = 0; j < cols; j++) {
        t = x[j];
        x[j] = y[j];
        y[j] = t;
    }
}

/* Convert the whole buffer into (dir > 0) or out of (dir < 0) Montgomery
 * form.  Returns -1 if an input entry is out of range. */
static int
mont_convert(const mont_t *m, uint64_t *a, Py_ssize_t n, int dir)
{
    Py_ssize_t i;
    if (dir > 0) {
        for (i = 0; i < n; i++) {
            if (a[i] >= m->p)
                return -1;
            a[i] = mont_mul(m, a[i], m->r2);
        }
    } else {
        for (i = 0; i < n; i++)
            a[i] = mont_mul(m, a[i], 1);
    }
    return 0;
}

/* Forward elimination; returns the rank.  Buffer is left in Montgomery
 * echelon form (callers treating it as scratch).  When pivcols is non-NULL
 * it receives the pivot column of each of the first `rank` rows. */
static Py_ssize_t
forward_eliminate(const mont_t *m, uint64_t *a, Py_ssize_t rows,
                  Py_ssize_t cols, Py_ssize_t *pivcols)
{
    Py_ssize_t cur = 0, col, r, j;
    for (col = 0; col < cols && cur < rows; col++) {
        Py_ssize_t piv = -1;
        for (r = cur; r < rows; r++) {
            if (a[r * cols + col]) {
                piv = r;
                break;
            }
        }
        if (piv < 0)
            continue;
        swap_rows(a, cols, cur, piv);
        if (pivcols)
            pivcols[cur] = col;
        {
            uint64_t inv = mont_pow(m, a[cur * cols + col], m->p - 2);
            uint64_t *prow = a + cur * cols;
            for (r = cur + 1; r < rows; r++) {
                uint64_t *row = a + r * cols;
                uint64_t f = row[col];
                if (!f)
                    continue;
                f = mont_mul(m, f, inv);
                row[col] = 0;
                for (j = col + 1; j < cols; j++) {
                    if (prow[j])
                        row[j] = sub_mod(row[j], mont_mul(m, f, prow[j]), m->p);
                }
            }
        }
        cur++;
    }
    return cur;
}

/* Backward pass: normalize pivots to 1 and clear entries above them. */
static void
backward_reduce(const mont_t *m, uint64_t *a, Py_ssize_t cols,
                Py_ssize_t rank, const Py_ssize_t *pivcols)
{
    Py_ssize_t i, r, j;
    for (i = rank - 1; i >= 0; i--) {
        Py_ssize_t col = pivcols[i];
        uint64_t *prow = a + i * cols;
        uint64_t inv = mont_pow(m, prow[col], m->p - 2);
        for (j = col; j < cols; j++)
            prow[j] = mont_mul(m, prow[j], inv);
        for (r = 0; r < i; r++) {
            uint64_t *row = a + r * cols;
            uint64_t f = row[col];
            if (!f)
                continue;
            row[col] = 0;
            for (j = col + 1; j < cols; j++) {
                if (prow[j])
                    row[j] = sub_mod(row[j], mont_mul(m, f, prow[j]), m->p);
            }
        }
    }
}

static int
parse_args(PyObject *args, Py_buffer *view, Py_ssize_t *rows,
           Py_ssize_t *cols, uint64_t *p)
{
    unsigned long long pval;
    if (!PyArg_ParseTuple(args, "w*nnK", view, rows, cols, &pval))
        return -1;
    if (*rows < 0 || *cols < 0 ||
        view->len != (Py_ssize_t)(*rows * *cols * sizeof(uint64_t))) {
        PyErr_SetString(PyExc_ValueError, "buffer does not match rows*cols");
        goto fail;
    }
    if (pval < 3 || (pval & 1) == 0 || pval >= (1ULL << 62)) {
        PyErr_SetString(PyExc_ValueError, "p must be an odd prime below 2^62");
        goto fail;
    }
    *p = (uint64_t)pval;
    return 0;
fail:
    PyBuffer_Release(view);
    return -1;
}

static PyObject *
do_reduce(PyObject *args, int full)
{
    Py_buffer view;
    Py_ssize_t rows, cols, rank;
    uint64_t p;
    mont_t m;
    uint64_t *a;
    Py_ssize_t *pivcols = NULL;
    int bad = 0;

    if (parse_args(args, &view, &rows, &cols, &p) < 0)
        return NULL;
    a = (uint64_t *)view.buf;
    mont_init(&m, p);
    if (full && rows > 0) {
        pivcols = PyMem_New(Py_ssize_t, rows);
        if (!pivcols) {
            PyBuffer_Release(&view);
            return PyErr_NoMemory();
        }
    }
    Py_BEGIN_ALLOW_THREADS
    if (mont_convert(&m, a, rows * cols, +1) < 0) {
        bad = 1;
    } else {
        rank = forward_eliminate(&m, a, rows, cols, pivcols);
        if (full) {
            backward_reduce(&m, a, cols, rank, pivcols);
            mont_convert(&m, a, rows * cols, -1);
        }
    }
    Py_END_ALLOW_THREADS
    if (pivcols)
        PyMem_Free(pivcols);
    PyBuffer_Release(&view);
    if (bad) {
        PyErr_SetString(PyExc_ValueError, "matrix entry not reduced mod p");
        return NULL;
    }
    return PyLong_FromSsize_t(rank);
}

static PyObject *
rowred_rank(PyObject *self, PyObject *args)
{
    (void)self;
    return do_reduce(args, 0);
}

static PyObject *
rowred_rref(PyObject *self, PyObject *args)
{
    (void)self;
    return do_reduce(args, 1);
}

static PyMethodDef rowred_methods[] = {
    {"rank", rowred_rank, METH_VARARGS,
     "rank(buf, rows, cols, p) -> int.  Destroys the buffer."},
    {"rref", rowred_rref, METH_VARARGS,
     "rref(buf, rows, cols, p) -> rank.  Buffer becomes the reduced row "
     "echelon form with unit pivots, entries as normal residues."},
    {NULL, NULL, 0, NULL},
};

static struct PyModuleDef rowred_module = {
    PyModuleDef_HEAD_INIT, "_rowred",
    "Dense row reduction over prime fields (Montgomery, 128-bit products).",
    -1, rowred_methods, NULL, NULL, NULL, NULL,
};

PyMODINIT_FUNC
PyInit__rowred(void)
{
    return PyModule_Create(&rowred_module);
}
