fn Waited(count: &mut u8, req: &mut u8) {
    *count = count.saturating_add(1);
    *req = *count;
}
