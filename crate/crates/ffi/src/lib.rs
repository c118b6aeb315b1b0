//! C interface to the grid toll solvers.
//!
//! Every call returns a [`GtStatus`]. Results come back through out-pointers;
//! handles are freed with their `*_free` function and strings with
//! [`gt_string_free`]. After a failure, [`gt_last_error`] describes it.
//! Money crosses the boundary as `"num/den"` or `"inf"` strings.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gridtoll::decomposition::{solve, SolveOptions};
use gridtoll::gen::{generate, GenConfig};
use gridtoll::io::{instance_to_json, parse_instance, parse_pricing, pricing_to_json};
use gridtoll::oracle::brute_force_opt;
use gridtoll::{Error, GridInstance, Money, PriceSet, Pricing};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GtStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    /// The edge guard or the state budget refused the request.
    Limit = 5,
    Internal = 6,
    Panic = 7,
}

/// A grid with its drivers.
pub struct GtInstance(GridInstance);

/// A price (or infinity) on every edge of a grid.
pub struct GtPricing(Pricing);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> GtStatus {
    match e {
        Error::Parse(_) => GtStatus::Parse,
        e if e.is_limit() => GtStatus::Limit,
        Error::SelfCheck(_) => GtStatus::Internal,
        _ => GtStatus::InvalidInput,
    }
}

/// Runs `f`, recording any failure for [`gt_last_error`].
fn guard(f: impl FnOnce() -> Result<(), (GtStatus, String)>) -> GtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GtStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside gridtoll");
            GtStatus::Panic
        }
    }
}

fn fail(e: Error) -> (GtStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (GtStatus, String) {
    (GtStatus::NullArgument, format!("`{name}` is null"))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, (GtStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (GtStatus::InvalidUtf8, format!("`{name}` is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, (GtStatus, String)> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

unsafe fn put_string(out: *mut *mut c_char, s: String) {
    *out = CString::new(s).expect("generated strings contain no nul").into_raw();
}

unsafe fn put_money(out: *mut *mut c_char, m: &Money) {
    if !out.is_null() {
        put_string(out, m.to_canonical_string());
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` is null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance file's contents.
///
/// # Safety
/// `json` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gt_instance_from_json(json: *const c_char, out: *mut *mut GtInstance) -> GtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = parse_instance(text(json, "json")?).map_err(fail)?;
        put(out, GtInstance(g));
        Ok(())
    })
}

/// Seeded random instance with the default budget pattern and no missing edges.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gt_instance_generate(
    width: usize,
    length: usize,
    drivers: usize,
    seed: u64,
    out: *mut *mut GtInstance,
) -> GtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = generate(&GenConfig::new(width, length, drivers, seed)).map_err(fail)?;
        put(out, GtInstance(g));
        Ok(())
    })
}

/// # Safety
/// `inst` is a live handle; `out` is writable. Free the result with [`gt_string_free`].
#[no_mangle]
pub unsafe extern "C" fn gt_instance_to_json(inst: *const GtInstance, out: *mut *mut c_char) -> GtStatus {
    guard(|| {
        let g = handle(inst, "inst")?;
        if out.is_null() {
            return Err(null("out"));
        }
        put_string(out, instance_to_json(&g.0));
        Ok(())
    })
}

/// # Safety
/// `inst` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gt_instance_free(inst: *mut GtInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Parses a pricing file for `inst`.
///
/// # Safety
/// `inst` is a live handle, `json` a nul-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gt_pricing_from_json(
    inst: *const GtInstance,
    json: *const c_char,
    out: *mut *mut GtPricing,
) -> GtStatus {
    guard(|| {
        let g = handle(inst, "inst")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = parse_pricing(text(json, "json")?, &g.0).map_err(fail)?;
        put(out, GtPricing(p));
        Ok(())
    })
}

/// # Safety
/// `pricing` is a live handle; `out` is writable. Free the result with [`gt_string_free`].
#[no_mangle]
pub unsafe extern "C" fn gt_pricing_to_json(pricing: *const GtPricing, out: *mut *mut c_char) -> GtStatus {
    guard(|| {
        let p = handle(pricing, "pricing")?;
        if out.is_null() {
            return Err(null("out"));
        }
        put_string(out, pricing_to_json(&p.0));
        Ok(())
    })
}

/// # Safety
/// `pricing` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gt_pricing_free(pricing: *mut GtPricing) {
    if !pricing.is_null() {
        drop(Box::from_raw(pricing));
    }
}

/// Revenue `pricing` earns on `inst`.
///
/// # Safety
/// Both handles are live; `revenue` is writable.
#[no_mangle]
pub unsafe extern "C" fn gt_revenue(
    inst: *const GtInstance,
    pricing: *const GtPricing,
    revenue: *mut *mut c_char,
) -> GtStatus {
    guard(|| {
        let g = handle(inst, "inst")?;
        let p = handle(pricing, "pricing")?;
        if revenue.is_null() {
            return Err(null("revenue"));
        }
        let r = gridtoll::revenue(&g.0, &p.0).map_err(fail)?;
        put_money(revenue, &r);
        Ok(())
    })
}

/// Runs the full solver. `state_budget` of zero selects the default.
///
/// # Safety
/// `inst` is a live handle; `out` is writable; `revenue` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn gt_solve(
    inst: *const GtInstance,
    state_budget: usize,
    skip_over_budget: bool,
    out: *mut *mut GtPricing,
    revenue: *mut *mut c_char,
) -> GtStatus {
    guard(|| {
        let g = handle(inst, "inst")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut opts = SolveOptions { skip_over_budget, ..SolveOptions::default() };
        if state_budget > 0 {
            opts.state_budget = state_budget;
        }
        let sol = solve(&g.0, &opts).map_err(fail)?;
        put_money(revenue, &sol.revenue);
        put(out, GtPricing(sol.pricing));
        Ok(())
    })
}

/// Best uniform price on every present edge.
///
/// # Safety
/// `inst` is a live handle; `out` is writable; `revenue` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn gt_single_price(
    inst: *const GtInstance,
    out: *mut *mut GtPricing,
    revenue: *mut *mut c_char,
) -> GtStatus {
    guard(|| {
        let g = handle(inst, "inst")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = gridtoll::baseline::best_single_price(&g.0);
        put_money(revenue, &s.revenue);
        put(out, GtPricing(s.pricing(&g.0)));
        Ok(())
    })
}

/// Exhaustive optimum over the rounded price set; refuses grids with more
/// than `edge_guard` present edges.
///
/// # Safety
/// `inst` is a live handle; `out` is writable; `revenue` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn gt_oracle(
    inst: *const GtInstance,
    edge_guard: usize,
    out: *mut *mut GtPricing,
    revenue: *mut *mut c_char,
) -> GtStatus {
    guard(|| {
        let g = handle(inst, "inst")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let set = PriceSet::new(&g.0.b_max(), g.0.length(), g.0.drivers.len().max(1));
        let sol = brute_force_opt(&g.0, &set, edge_guard).map_err(fail)?;
        put_money(revenue, &sol.revenue);
        put(out, GtPricing(sol.pricing));
        Ok(())
    })
}
