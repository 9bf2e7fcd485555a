//! C ABI for `nashmg`.
//!
//! Games and policy pairs cross the boundary as opaque handles that must be
//! released with their `_free` function. Every fallible call returns a
//! [`NashmgStatus`]; on failure [`nashmg_last_error`] describes the problem.
//! Strings returned by the library are owned by the caller and released with
//! [`nashmg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use nashmg::oracle::{exact_nash_solve, exploitability_with_budget, DEFAULT_NODE_BUDGET};
use nashmg::{generate_random_mg, solve_lp, Error, PayoffMatrix, PolicyPair, TabularMG};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NashmgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    MalformedInput = 4,
    Io = 5,
    SolverFailure = 6,
    BudgetExceeded = 7,
    Panic = 8,
}

/// Tabular zero-sum Markov game.
pub struct NashmgGame(TabularMG);

/// Max-player and min-player strategies.
pub struct NashmgPolicyPair(PolicyPair);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> NashmgStatus {
    match err {
        Error::NonFinite | Error::InvalidArgument(_) | Error::Config(_) => NashmgStatus::InvalidArgument,
        Error::DimensionMismatch { .. } => NashmgStatus::DimensionMismatch,
        Error::MalformedInput(_) | Error::InvariantViolation(_) => NashmgStatus::MalformedInput,
        Error::InfeasibleLp | Error::ToleranceNotMet { .. } => NashmgStatus::SolverFailure,
        Error::HistoryBudgetExceeded { .. } => NashmgStatus::BudgetExceeded,
        Error::Io(_) => NashmgStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
    Arg(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NashmgStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f));
    let (status, msg) = match outcome {
        Ok(Ok(())) => {
            set_last_error("");
            return NashmgStatus::Ok;
        }
        Ok(Err(Failure::Null(name))) => (NashmgStatus::NullPointer, format!("`{name}` is null")),
        Ok(Err(Failure::Arg(msg))) => (NashmgStatus::InvalidArgument, msg),
        Ok(Err(Failure::Lib(e))) => (status_of(&e), e.to_string()),
        Err(_) => (NashmgStatus::Panic, "internal panic".to_string()),
    };
    set_last_error(&msg);
    status
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Arg(format!("`{name}` is not valid UTF-8")))
}

fn owned_string(bytes: Vec<u8>) -> Result<*mut c_char, Failure> {
    let c = CString::new(bytes).map_err(|_| Failure::Arg("output contains a NUL byte".into()))?;
    Ok(c.into_raw())
}

/// Message for the most recent failed call on this thread; empty after a
/// successful call. Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn nashmg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nashmg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn nashmg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Generates a random game with the given sizes.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn nashmg_game_generate(
    states: usize,
    actions_max: usize,
    actions_min: usize,
    horizon: usize,
    seed: u64,
    out: *mut *mut NashmgGame,
) -> NashmgStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let game = generate_random_mg(states, actions_max, actions_min, horizon, seed)?;
        *out = Box::into_raw(Box::new(NashmgGame(game)));
        Ok(())
    })
}

/// Parses a game from the JSON environment format.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn nashmg_game_from_json(json: *const c_char, out: *mut *mut NashmgGame) -> NashmgStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let out = out_ref(out, "out")?;
        *out = Box::into_raw(Box::new(NashmgGame(TabularMG::from_bytes(text.as_bytes())?)));
        Ok(())
    })
}

/// Loads a game from an environment file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn nashmg_game_load(path: *const c_char, out: *mut *mut NashmgGame) -> NashmgStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let out = out_ref(out, "out")?;
        *out = Box::into_raw(Box::new(NashmgGame(TabularMG::load(Path::new(path))?)));
        Ok(())
    })
}

/// Serializes a game; release the result with [`nashmg_string_free`].
///
/// # Safety
/// `game` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nashmg_game_to_json(game: *const NashmgGame, out: *mut *mut c_char) -> NashmgStatus {
    guard(|| {
        let game = deref(game, "game")?;
        let out = out_ref(out, "out")?;
        *out = owned_string(game.0.to_bytes())?;
        Ok(())
    })
}

/// Writes horizon, state count and both action counts.
///
/// # Safety
/// `game` must be a live handle; the output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nashmg_game_dims(
    game: *const NashmgGame,
    horizon: *mut usize,
    states: *mut usize,
    actions_max: *mut usize,
    actions_min: *mut usize,
) -> NashmgStatus {
    guard(|| {
        let dims = deref(game, "game")?.0.dims();
        *out_ref(horizon, "horizon")? = dims.horizon;
        *out_ref(states, "states")? = dims.states;
        *out_ref(actions_max, "actions_max")? = dims.actions_max;
        *out_ref(actions_min, "actions_min")? = dims.actions_min;
        Ok(())
    })
}

/// Releases a game. Null is ignored.
///
/// # Safety
/// `game` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn nashmg_game_free(game: *mut NashmgGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Solves the game exactly, writing the value at the initial state and,
/// when `pair_out` is not null, an equilibrium policy pair.
///
/// # Safety
/// `game` must be a live handle and `value` valid; `pair_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn nashmg_game_solve(
    game: *const NashmgGame,
    value: *mut f64,
    pair_out: *mut *mut NashmgPolicyPair,
) -> NashmgStatus {
    guard(|| {
        let game = &deref(game, "game")?.0;
        let value = out_ref(value, "value")?;
        let sol = exact_nash_solve(game)?;
        *value = sol.value(game);
        if let Some(slot) = pair_out.as_mut() {
            *slot = Box::into_raw(Box::new(NashmgPolicyPair(PolicyPair::new(sol.mu_star, sol.nu_star))));
        }
        Ok(())
    })
}

/// Parses a policy pair from the JSON policy format.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn nashmg_policy_pair_from_json(json: *const c_char, out: *mut *mut NashmgPolicyPair) -> NashmgStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let out = out_ref(out, "out")?;
        *out = Box::into_raw(Box::new(NashmgPolicyPair(PolicyPair::from_bytes(text.as_bytes())?)));
        Ok(())
    })
}

/// Serializes a policy pair; release the result with [`nashmg_string_free`].
///
/// # Safety
/// `pair` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nashmg_policy_pair_to_json(pair: *const NashmgPolicyPair, out: *mut *mut c_char) -> NashmgStatus {
    guard(|| {
        let pair = deref(pair, "pair")?;
        let out = out_ref(out, "out")?;
        *out = owned_string(pair.0.to_bytes())?;
        Ok(())
    })
}

/// Releases a policy pair. Null is ignored.
///
/// # Safety
/// `pair` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn nashmg_policy_pair_free(pair: *mut NashmgPolicyPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Exact exploitability of `pair` in `game`. A `node_budget` of zero selects
/// the default history-search budget.
///
/// # Safety
/// Both handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn nashmg_exploitability(
    game: *const NashmgGame,
    pair: *const NashmgPolicyPair,
    node_budget: usize,
    out: *mut f64,
) -> NashmgStatus {
    guard(|| {
        let game = &deref(game, "game")?.0;
        let pair = &deref(pair, "pair")?.0;
        let out = out_ref(out, "out")?;
        pair.check_against(game)?;
        let budget = if node_budget == 0 { DEFAULT_NODE_BUDGET } else { node_budget };
        *out = exploitability_with_budget(game, &pair.max_player, &pair.min_player, budget)?;
        Ok(())
    })
}

/// Solves the `rows × cols` matrix game with row-major `entries` (payoffs to
/// the row player). Writes `rows` and `cols` probabilities to `row_strategy`
/// and `col_strategy`, the value to `value` and the duality gap to `eps`;
/// `eps` may be null.
///
/// # Safety
/// `entries` must hold `rows·cols` doubles; the strategy buffers must hold
/// `rows` and `cols` doubles respectively.
#[no_mangle]
pub unsafe extern "C" fn nashmg_solve_matrix(
    rows: usize,
    cols: usize,
    entries: *const f64,
    tol: f64,
    row_strategy: *mut f64,
    col_strategy: *mut f64,
    value: *mut f64,
    eps: *mut f64,
) -> NashmgStatus {
    guard(|| {
        if entries.is_null() {
            return Err(Failure::Null("entries"));
        }
        if row_strategy.is_null() {
            return Err(Failure::Null("row_strategy"));
        }
        if col_strategy.is_null() {
            return Err(Failure::Null("col_strategy"));
        }
        let value = out_ref(value, "value")?;
        let n = rows.checked_mul(cols).ok_or_else(|| Failure::Arg("matrix size overflows".into()))?;
        let a = PayoffMatrix::new(rows, cols, std::slice::from_raw_parts(entries, n).to_vec())?;
        let sol = solve_lp(&a, tol)?;
        ptr::copy_nonoverlapping(sol.row_strategy.probs().as_ptr(), row_strategy, rows);
        ptr::copy_nonoverlapping(sol.col_strategy.probs().as_ptr(), col_strategy, cols);
        *value = sol.value;
        if let Some(e) = eps.as_mut() {
            *e = sol.eps;
        }
        Ok(())
    })
}
