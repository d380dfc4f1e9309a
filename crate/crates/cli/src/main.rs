fn main() {
    println!("rt: placeholder");
}
