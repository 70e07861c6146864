fn Waited(count: &mut u8, req: &mut u8) {
    *count = count.saturating_add(1);
    *req = *count;
}

#[cfg(kani)]
#[kani::proof]
#[allow(unused_mut, unused_variables, unused_parens)]
fn check_Waited() {
    let mut count: u8 = kani::any();
    let mut req: u8 = kani::any();
    let old_count = count;
    let old_req = req;
    kani::assume(true);
    Waited(&mut count, &mut req);
    let new_count = count;
    let new_req = req;
    assert!(((count == (if (old_count < 255u8) { old_count.wrapping_add(1u8) } else { 255u8 })) && (req == count)));
}
